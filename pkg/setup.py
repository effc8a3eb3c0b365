"""
CKNKit - Numerical toolkit for the CKN operator
Copyright (c) 2025 Arjun-M/CKNKit
"""

from setuptools import setup, find_packages

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

with open("requirements.txt", "r", encoding="utf-8") as fh:
    requirements = [line.strip() for line in fh if line.strip() and not line.startswith("#")]

setup(
    name="cknkit",
    version="1.0.0",
    author="Arjun-M",
    author_email="",
    description="Exponents, fundamental solutions, singular quadrature, Poisson solver and Liouville certificates for the CKN operator",
    long_description=long_description,
    long_description_content_type="text/markdown",
    url="https://github.com/Arjun-M/CKNKit",
    package_dir={'': '.'},
    packages=find_packages(where='.', include=['CKNKit', 'CKNKit.*']),
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Mathematics",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
        "Framework :: AsyncIO"
    ],
    python_requires=">=3.10",
    install_requires=requirements,
    extras_require={
        "dev": [
            "pytest>=7.4.0,<9.0.0",
            "pytest-asyncio>=0.21.0,<0.24.0",
            "hypothesis>=6.80.0",
        ]
    },
    entry_points={
        "console_scripts": [
            "cknkit=CKNKit.cli:main",
        ]
    },
)
