from setuptools import setup, find_packages

import os

SETUP_PTH = os.path.dirname(os.path.abspath(__file__))

with open(os.path.join(SETUP_PTH, "README.md")) as f:
    desc = f.read()


setup(
    name="cva-lab",
    packages=find_packages(include=["cva_lab", "cva_lab.*"]),
    version="0.0.1",
    install_requires=[
        "monty",
        "numpy",
        "pydantic>=2",
        "pydantic-settings",
        "requests",
        "ruamel.yaml",
    ],
    extras_require={"tests": ["pytest", "pytest-cov"]},
    package_data={"cva_lab": ["*.yaml"]},
    entry_points={"console_scripts": ["cva-lab = cva_lab.cli:main"]},
    license="BSD",
    description="Executable laws, trace models and local inference for concurrent valuation algebras",
    long_description=desc,
    long_description_content_type="text/markdown",
    keywords=["valuation algebra", "concurrency"],
    python_requires=">=3.10",
    classifiers=[
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.10",
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: BSD License",
        "Operating System :: OS Independent",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Topic :: Software Development :: Libraries :: Python Modules",
    ],
)
