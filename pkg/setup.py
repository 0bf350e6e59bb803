import setuptools

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

setuptools.setup(
    name="pbgdecay",
    version="0.3.0",
    description="Qubit decoherence in photonic band-gap reservoirs: exact series, oracles and inverse power laws.",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=setuptools.find_packages(exclude=["tests", "tests.*"]),
    include_package_data=True,
    package_data={
        "pbgdecay": ["data/*.json"],
    },
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: GNU General Public License v3 or later (GPLv3+)",
        "Operating System :: OS Independent",
        "Topic :: Scientific/Engineering :: Physics",
    ],
    entry_points={
        "console_scripts": [
            "pbgdecay = pbgdecay.main:main",
        ],
    },
    install_requires=[
        "tqdm",
        "numpy",
        "scipy",
    ],
    extras_require={
        "tests": ["pytest", "hypothesis", "mpmath"],
    },
    python_requires='>=3.8',
)
