from setuptools import setup, find_namespace_packages

setup(
    name="alsim",
    version="0.1.0",
    package_dir={"": "src"},
    packages=find_namespace_packages(where="src"),
    description="Simulator for pool-based active learning with automatic and crowd labels",
    python_requires=">=3.10",
    install_requires=[
        "numpy",
        "pandas",
        "scikit-learn",
        "scipy",
        "pydantic>=2",
        "PyYAML",
        "python-dotenv",
        "click",
    ],
    entry_points={
        "console_scripts": [
            "alsim=alsim.harness.cli:main",
        ],
    },
)
