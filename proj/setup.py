import os
import subprocess

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup


def eigen_include():
    try:
        out = subprocess.run(["pkg-config", "--cflags-only-I", "eigen3"],
                             capture_output=True, text=True, check=True).stdout
        for flag in out.split():
            if flag.startswith("-I"):
                return flag[2:]
    except (OSError, subprocess.CalledProcessError):
        pass
    return "/usr/include/eigen3"


sources = sorted(
    os.path.join("src", f) for f in os.listdir("src") if f.endswith(".cpp")
) + ["python/bindings.cpp"]

setup(
    ext_modules=[
        Pybind11Extension(
            "nslb",
            sources,
            include_dirs=["include", "vendor", eigen_include()],
            cxx_std=20,
        )
    ],
    cmdclass={"build_ext": build_ext},
)
