"""A setuptools based setup module
"""
import setuptools
import re

START_TAG = r"^\s*\<\!--.*exclude\s+package.*--\>\s*$"
END_TAG = r"^\s*\<\!--.*end\s+exclude\s+package.*--\>\s*$"

with open("README.md", "r") as fh:
    # exclude lines from readme that dont apply to publication in package
    # for example the design notes section refers to repository relative paths
    long_description = fh.read()
    modified_description_lines = []
    marked = False

    for line in long_description.split("\n"):
        if re.match(START_TAG, line) or re.match(END_TAG, line):
            marked = True
        if not marked:
            modified_description_lines.append(line)
        if re.match(END_TAG, line):
            marked = False

    long_description = "\n".join(modified_description_lines)

setuptools.setup(
    name="purimeter",
    version="0.1.0",
    description="Purity estimation from balanced homodyne quadrature records",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=['purimeter',
              'purimeter.distributions'
              ],
    install_requires=[
        "numpy>=1.22",
        "pandas>=1.5",
        "scipy>=1.8",
        "pyparsing>=2.4.7",
        "jmespath>=0.10.0",
    ],
    entry_points={
        "console_scripts": ["purimeter=purimeter.cli:main"],
    },
    license="Apache License 2.0",
    classifiers=[
        "Programming Language :: Python :: 3",
        "Operating System :: OS Independent",
        "Topic :: Scientific/Engineering :: Physics",
        "Intended Audience :: Science/Research",
    ],
    python_requires='>=3.8.10',
)
