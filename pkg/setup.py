from setuptools import setup, find_packages

setup(
    name="mfg-reset-solver",
    packages=find_packages(exclude=["tests*", "examples*"]),
    install_requires=["numpy", "scipy", "pandas", "joblib", "tqdm", "timeout-decorator", "tabulate"],
)
