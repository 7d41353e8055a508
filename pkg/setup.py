import re

import setuptools

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

with open("requirements.txt", "r") as fh:
    requirements = [line.strip() for line in fh if line.strip() and not line.startswith('#')]

with open("loranbi/_version.py", "r") as fh:
    version = re.search(r"__version__ = ['\"]([^'\"]+)['\"]", fh.read()).group(1)

setuptools.setup(
    name="LoRa-NBI-analysis",
    version=version,
    description="Monte Carlo analysis of LoRa robustness against narrowband BPSK and GMSK interference",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=setuptools.find_packages(exclude=['tests']),
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
    ],
    python_requires='>=3.8',
    install_requires=requirements,
    entry_points={'console_scripts': ['loranbi=loranbi.cli:main']},
)
