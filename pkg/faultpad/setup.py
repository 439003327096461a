from setuptools import setup, find_packages
setup(
    name="faultpad",
    version="0.1",
    packages=find_packages(exclude=["tests"]),
    install_requires=['matplotlib',
                      'numpy',
                      'pandas',
                      'psutil',
                      'scipy',
                      'tqdm'],
    extras_require={'test': ['pytest']}
)
