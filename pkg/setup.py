"""Build script: compiles the Dormand-Prince kernel when Cython is available.

The package is fully functional without the extension (a pure-Python twin of
the kernel is selected at import time), so a missing or failing compiler only
costs speed.
"""
from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "expanders._ode_cy",
                ["src/expanders/_ode_cy.pyx"],
                # Keep the compiled lane bit-identical to the pure Python
                # twin: no fused multiply-add contraction, and sin/cos left
                # as opaque libm calls so GCC cannot pair them into sincos
                # (glibc's sincos is not bit-equal to separate calls).
                # Verified by tests and the benchmark.
                extra_compile_args=[
                    "-O3",
                    "-ffp-contract=off",
                    "-fno-builtin-sin",
                    "-fno-builtin-cos",
                ],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
