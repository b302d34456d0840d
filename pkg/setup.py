#!/usr/bin/env python
"""@todo:
 - Identify minimum dependency versions properly.
"""

__author__ = "twlab contributors"
__license__ = "GNU GPL 2 or later"

from setuptools import setup, find_packages
from twlab.version import __version__

if __name__ == '__main__':
    setup(
        name='twlab',
        version=__version__,
        description='Tweedie-regression ranking laboratory',
        long_description="""
            A reproducible lab for ranking by watch time: a compound
            Poisson-gamma distribution engine, four ranking losses over a
            small hand-differentiated neural ranker, a synthetic-user
            simulation comparing them, KS-based distribution fitting and a
            Taylor-basis loss decomposition.
            """,
        author="twlab contributors",
        license="https://www.gnu.org/licenses/old-licenses/gpl-2.0.html",
        classifiers=[
            "Development Status :: 3 - Alpha",
            "Environment :: Console",
            "Intended Audience :: Science/Research",
            "License :: OSI Approved :: GNU General Public License v2 "
                "or later (GPLv2+)",  # pylint: disable=bad-continuation
            "Natural Language :: English",
            "Operating System :: POSIX",
            "Programming Language :: Python :: 3",
            "Topic :: Scientific/Engineering :: Mathematics",
        ],

        python_requires='>=3.8',
        install_requires=['numpy>=1.17', 'scipy'],
        extras_require={'test': ['pytest>=7']},
        packages=find_packages(exclude=['tests']),

        # Causes a ZipImport error the second time you run `setup.py install`
        # on the same system
        zip_safe=False,

        entry_points={
            'console_scripts': [
                'twlab = twlab.__main__:main',
                'tw-simulate = twlab.__main__:main',
                'tw-fit = twlab.__main__:main',
                'tw-decompose = twlab.__main__:main',
                'tw-gradcheck = twlab.__main__:main',
                'tw-sample = twlab.__main__:main',
            ],
        },
    )

# vim: set sw=4 sts=4 :
