from setuptools import setup

setup(
    name='faultpad_experiments',
    version='0.1.0',
    description='experiment drivers for faultpad',
    license='Apache 2.0',
    packages=[],
    install_requires=['numpy', 'scipy', 'pandas', 'matplotlib', 'tqdm', 'psutil']
)
