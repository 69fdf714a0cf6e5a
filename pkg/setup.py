from setuptools import setup, find_packages

setup(
    name="fixedb-calib",
    version="0.1.0",
    description="Fixed-b calibrated subsampling and moving block bootstrap inference for time series",
    long_description=open("README.md").read(),
    long_description_content_type="text/markdown",
    packages=find_packages(include=["src", "src.*"]),
    package_dir={"": "."},  # Point to the root folder
    package_data={
        "src": ["cv_table.csv"],  # Shipped critical-value table
    },
    install_requires=[
        "numpy>=1.22",
        "scipy>=1.8",
        "pandas>=1.4",
        "sqlalchemy>=2.0.0",
        "python-dotenv>=1.0.0",
    ],
    extras_require={
        "test": ["pytest>=7.0", "hypothesis>=6.0"],
    },
    entry_points={
        "console_scripts": [
            "fixedb-calib=src.cli:main",
        ],
    },
    classifiers=[
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    python_requires=">=3.9",
    keywords="subsampling block bootstrap fixed-b time series confidence interval",
)
