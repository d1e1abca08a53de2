import os
import re
from setuptools import setup

short_desc = "Frequency-filtered two-photon correlations of quantum emitters"

try:
    fname = 'README.rst'
    long_desc = open(os.path.join(os.path.dirname(__file__), fname)).read()
except IOError:
    long_desc = short_desc


def get_version():
    with open(os.path.join(os.path.dirname(__file__), 'twophoton', '__init__.py')) as f:
        return re.search(r"__version__ = '([^']+)'", f.read()).group(1)


setup(
    name="twophoton",
    version=get_version(),
    description=short_desc,
    license="BSD",
    keywords="quantum optics photon correlations lindblad spectroscopy",
    scripts=['bin/twophoton'],
    packages=[
        'twophoton',
        'twophoton.cli',
        'twophoton.cli.test',
        'twophoton.core',
        'twophoton.core.test',
        'twophoton.formats',
        'twophoton.formats.tests',
        'twophoton.stream',
        'twophoton.stream.test',
        'twophoton.util',
    ],
    package_data={
        "twophoton.formats": ["config.example.yaml"],
        "twophoton.util": ["logging_config.yaml"],
    },
    install_requires=[
        "numpy>=1.17",
        "scipy>=1.4",
        "PyYAML>=5.1",
        "jsonschema>=3.0",
    ],
    extras_require={
        "tests": ["pytest", "hypothesis"],
    },
    long_description=long_desc,
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Physics",
        "License :: OSI Approved :: BSD License",
        "Programming Language :: Python :: 3",
    ],
)
