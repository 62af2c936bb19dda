import setuptools

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

setuptools.setup(
    name="difftomo",
    version="0.1",
    description="diffraction tomography toolkit: Born/Rytov simulation, Fourier coverage and backpropagation",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=setuptools.find_packages(exclude=["tests", "tests.*", "examples", "examples.*"]),
    classifiers=[
        "Programming Language :: Python :: 3",
        "Operating System :: OS Independent",
    ],
    install_requires=[
        "rich",
        "nanoid",
        "numpy",
        "scipy",
        "scikit-image"
    ],
    extras_require={
        "test": ["pytest"]
    },
    entry_points={
        'console_scripts': ['difftomo=difftomo.script_ctl:main'],
    },
    python_requires='>=3.9',
)
