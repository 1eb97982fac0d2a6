from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("nrpdcch._ckernels", ["src/nrpdcch/_ckernels.pyx"])],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # Pure-Python fallback kernels are selected at import when the
    # extension is unavailable; the package stays fully functional.
    ext_modules = []

setup(ext_modules=ext_modules)
