#!/usr/bin/env python
import os
import sys
from setuptools import find_packages, setup  # @UnresolvedImport


package_name = 'recipnet'
package_dir = os.path.join(os.path.dirname(__file__), package_name)

# Filter unittests from packages
packages = [p for p in find_packages() if not p.startswith('test')]

sys.path.insert(0, package_dir)
from version import __version__  # @IgnorePep8 @UnresolvedImport
sys.path.pop(0)

setup(
    name=package_name,
    version=__version__,
    scripts=[os.path.join('scripts', 'recipnet')],
    packages=packages,
    author="The RecipNet Team",
    description=(
        "Reciprocal learning of forward and backward trajectory prediction "
        "networks, with a reciprocal attack that refines predictions at "
        "test time"),
    long_description=open("README.rst").read(),
    license="MIT",
    keywords=("trajectory prediction pedestrian LSTM GAN social pooling "
              "reciprocal learning adversarial attack ETH UCY"),
    classifiers=['Development Status :: 4 - Beta',
                 'Environment :: Console',
                 'Intended Audience :: Science/Research',
                 'License :: OSI Approved :: MIT License',
                 'Natural Language :: English',
                 'Operating System :: OS Independent',
                 'Programming Language :: Python :: 3',
                 'Topic :: Scientific/Engineering'],
    install_requires=[
        'numpy>=1.13',
        'PyYAML>=3.11',
        'h5py>=2.7.0',
        'matplotlib>=2.0'],
    tests_require=['pytest'],
    python_requires='>=3.5, <4'
)
