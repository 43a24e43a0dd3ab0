from setuptools import setup, find_packages

setup(
    name="lawbench",
    version="0.1.0",
    packages=find_packages(exclude=["tests", "tests.*", "examples", "examples.*"]),
    python_requires=">=3.9",
    install_requires=[
        "loguru>=0.7.0",
        "python-dotenv>=0.19.0",
        "pydantic>=2.0.0",
        "prometheus-client>=0.19.0",
        "psutil>=5.9.0",
        "cachetools>=5.3.0",
        "numpy>=1.24.0",
        "sympy>=1.12"
    ],
    entry_points={
        "console_scripts": [
            "lawbench=lawbench.cli:main",
        ],
    },
)
