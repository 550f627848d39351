from setuptools import Extension, setup

# The compiled kernel is optional: the package falls back to the pure-Python
# implementation in relayauction._kernel_py when the extension is missing.
# -ffp-contract=off keeps the compiled arithmetic bit-identical to CPython's
# (no fused multiply-add), which the backend-equivalence tests rely on.
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "relayauction._kernel",
                ["src/relayauction/_kernel.pyx"],
                extra_compile_args=["-O3", "-ffp-contract=off"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
