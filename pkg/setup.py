from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # no Cython: ship the pure-Python kernel only
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("icregion._vertex_kernel", ["src/icregion/_vertex_kernel.pyx"], optional=True)],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
