import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        import pybind11

        source_dir = Path(__file__).parent.resolve()
        out_dir = Path(self.get_ext_fullpath(ext.name)).parent.resolve()
        build_dir = Path(self.build_temp).resolve() / "cmake"
        build_dir.mkdir(parents=True, exist_ok=True)

        subprocess.run(
            [
                "cmake",
                "-S", str(source_dir),
                "-B", str(build_dir),
                "-DCMAKE_BUILD_TYPE=Release",
                "-DSPECTRAL_BUILD_TESTS=OFF",
                "-DSPECTRAL_BUILD_PYTHON=ON",
                f"-Dpybind11_DIR={pybind11.get_cmake_dir()}",
                f"-DPYTHON_EXECUTABLE={sys.executable}",
            ],
            check=True,
        )
        subprocess.run(
            ["cmake", "--build", str(build_dir), "--target", "_spectral", "-j"],
            check=True,
        )

        out_dir.mkdir(parents=True, exist_ok=True)
        built = next(build_dir.glob("_spectral*.so"))
        self.copy_file(str(built), str(out_dir / built.name))


setup(
    ext_modules=[CMakeExtension("spectral_markov._spectral")],
    cmdclass={"build_ext": CMakeBuild},
)
