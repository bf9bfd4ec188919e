from setuptools import find_packages, setup

package_name = "sparse_representation_control"

setup(
    name=package_name,
    version="0.1.0",
    packages=find_packages(include=[package_name, package_name + ".*"]),
    install_requires=["numpy", "scipy", "PyYAML"],
    python_requires=">=3.9",
    zip_safe=True,
    description="Sparse representations learned with distributional regularizers for control",
    license="BSD license",
    tests_require=["pytest", "hypothesis"],
    entry_points={
        "console_scripts": ["sparse-control = sparse_representation_control.cli:main"],
    },
)
