from setuptools import setup, find_packages

setup(
    name="hyperarousal-detect",
    version="0.1.0",
    description="Hyperarousal event detection from smartwatch heart rate and acceleration",
    package_dir={"": "src"},
    packages=find_packages(where="src"),
    python_requires=">=3.10",
    install_requires=[
        "numpy>=1.24",
        "scipy>=1.10",
        "pandas>=2.0",
        "matplotlib>=3.7",
        "pyyaml>=6.0",
        "python-dotenv>=1.0.0",
        "blessed>=1.20.0",
        "psutil>=5.9.5",
        "pydantic>=2.3.0",
    ],
    entry_points={
        "console_scripts": [
            "hyperarousal=hyperarousal.cli:main",
        ],
    },
)
