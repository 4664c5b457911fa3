from setuptools import setup, find_packages

with open("requirements.txt") as f:
	install_requires = f.read().strip().split("\n")

# get version from __version__ variable in nonreciprocal_entanglement/__init__.py
from nonreciprocal_entanglement import __version__ as version

setup(
	name="nonreciprocal_entanglement",
	version=version,
	description="Stationäre Simulation nichtreziproker Verschränkung in molekularer Optomechanik",
	author="itsdave GmbH",
	author_email="dev@itsdave.de",
	packages=find_packages(),
	zip_safe=False,
	include_package_data=True,
	package_data={
		"nonreciprocal_entanglement": ["fixtures/*.json", "model/*/*.json"],
	},
	install_requires=install_requires,
	entry_points={
		"console_scripts": [
			"nonreciprocal-entanglement=nonreciprocal_entanglement.cli:main",
		],
	},
)
