#!/usr/bin/env python3
# -*- coding: utf-8 -*-

from setuptools import setup  # pylint: disable=import-error
from setuptools import find_packages

setup(name="dkit",
		version="0.1.0",
		description="Causality checks on Lorentzian distance functions",
		packages=find_packages(include=["dkit", "dkit.*"]),
		package_data={
				"dkit": ["fixtures/*.csv"],
		},
		install_requires=[
				"numpy",
				"scipy",
				"networkx",
		],
		entry_points={
				"console_scripts": [
						"dkit=dkit.cli:main",
				],
		},
		classifiers=[
				"Development Status :: 3 - Alpha",
				"Intended Audience :: Science/Research",
				"Operating System :: POSIX",
				"Programming Language :: Python :: 3.12.3",
		],
		)

# vim: tabstop=4 shiftwidth=4
