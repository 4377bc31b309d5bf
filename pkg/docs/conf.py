#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# dynchain documentation build configuration file.
#
# This file is execfile()d with the current directory set to its
# containing dir.

import os
import sys

sys.path.insert(0, os.path.abspath(".."))

# -- General configuration ---------------------------------------------

extensions = ["sphinx.ext.autodoc", "sphinx.ext.viewcode", "sphinx_rtd_theme"]

templates_path = ["_templates"]
source_suffix = ".rst"
master_doc = "index"

project = "dynchain"
copyright = "2026, dynchain contributors"
author = "dynchain contributors"

# The short X.Y version, keep in sync with pyproject.toml
version = "0.1.0"
release = version

language = None
exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]
pygments_style = "sphinx"
todo_include_todos = False


# -- Options for HTML output -------------------------------------------

html_theme = "sphinx_rtd_theme"
html_static_path = ["_static"]
htmlhelp_basename = "dynchaindoc"


# -- Options for LaTeX output ------------------------------------------

latex_elements = {}
latex_documents = [
    (master_doc, "dynchain.tex", "dynchain Documentation", author, "manual"),
]


# -- Options for manual page output ------------------------------------

man_pages = [(master_doc, "dynchain", "dynchain Documentation", [author], 1)]


# -- Options for Texinfo output ----------------------------------------

texinfo_documents = [
    (
        master_doc,
        "dynchain",
        "dynchain Documentation",
        author,
        "dynchain",
        "Multi-label gradient boosted trees and dynamic classifier chains.",
        "Miscellaneous",
    ),
]
