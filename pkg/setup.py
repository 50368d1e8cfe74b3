#!/usr/bin/env python
# -*- coding: utf-8 -*-
from __future__ import (
    absolute_import,
    unicode_literals,
)

import codecs
import sys

from setuptools import (  # type: ignore
    find_packages,
    setup,
)

from token_lab import __version__


def readme():
    with codecs.open('README.rst', 'rb', encoding='utf8') as f:
        return f.read()


install_requires = [
    'attrs>=19.2,<22',
    'conformity>=1.26.9,!=1.27.0,<2.0',
    'numpy>=1.17',
    'scipy>=1.4',
    'six',
]

mypy_require = [
    'mypy~=0.740',
    'types-six~=0.1.7',
    'types-mock~=0.1.3',
]

tests_require = [
    'freezegun',
    'pytest',
    'pytest-cov',
    'pytest-runner',
    'mock',
] + mypy_require


setup(
    name='token-lab',
    version=__version__,
    description='Capacity bounds and simulations for timing channels built from identical tokens',
    long_description=readme(),
    packages=list(map(str, find_packages(include=['token_lab', 'token_lab.*']))),
    package_data={str('token_lab'): [str('py.typed')]},  # PEP 561
    zip_safe=False,  # PEP 561
    include_package_data=True,
    install_requires=install_requires,
    tests_require=tests_require,
    setup_requires=['pytest-runner'] if {'pytest', 'test', 'ptr'}.intersection(sys.argv) else [],
    test_suite='tests',
    extras_require={
        'testing': tests_require,
        'docs': ['sphinx~=2.2'],
    },
    entry_points={
        'console_scripts': [
            'token-lab=token_lab.cli:entry_point',
        ],
    },
    python_requires='>=3.8',
    license='Apache 2.0',
    classifiers=[
        'Development Status :: 4 - Beta',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: Apache Software License',
        'Operating System :: OS Independent',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Topic :: Scientific/Engineering :: Mathematics',
    ],
)
