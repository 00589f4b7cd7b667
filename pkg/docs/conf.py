#!/usr/bin/env python
#

import os
import sys
sys.path.insert(0, os.path.abspath('..'))

import dtqw_cycle_qnn

# -- General configuration ---------------------------------------------
extensions = ['sphinx.ext.autodoc', 'sphinx.ext.viewcode', 'sphinx_click.ext']
source_suffix = '.rst'
master_doc = 'index'
project = 'DTQW Cycle QNN'
copyright = "2026, DTQW Cycle QNN developers"
author = "DTQW Cycle QNN developers"
version = dtqw_cycle_qnn.__version__
release = dtqw_cycle_qnn.__version__
language = None
pygments_style = 'sphinx'
todo_include_todos = False
exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']

# -- Options for HTML output -------------------------------------------
html_theme = 'bizstyle'

# -- Options for HTMLHelp output ---------------------------------------
# Output file base name for HTML help builder.
htmlhelp_basename = 'dtqw_cycle_qnndoc'

# -- Options for LaTeX output ------------------------------------------

latex_elements = {
    # The paper size ('letterpaper' or 'a4paper').
    #
    # 'papersize': 'letterpaper',

    # The font size ('10pt', '11pt' or '12pt').
    #
    # 'pointsize': '10pt',

    # Additional stuff for the LaTeX preamble.
    #
    # 'preamble': '',

    # Latex figure (float) alignment
    #
    # 'figure_align': 'htbp',
}

# Grouping the document tree into LaTeX files. List of tuples
# (source start file, target name, title, author, documentclass
# [howto, manual, or own class]).
latex_documents = [
    (master_doc, 'dtqw_cycle_qnn.tex',
     'DTQW Cycle QNN Documentation',
     author, 'manual'),
]


# -- Options for manual page output ------------------------------------

# One entry per manual page. List of tuples
# (source start file, name, description, authors, manual section).
man_pages = [
    (master_doc, 'dtqw_cycle_qnn',
     'DTQW Cycle QNN Documentation',
     [author], 1)
]


# -- Options for Texinfo output ----------------------------------------

# Grouping the document tree into Texinfo files. List of tuples
# (source start file, target name, title, author,
#  dir menu entry, description, category)
texinfo_documents = [
    (master_doc, 'dtqw_cycle_qnn',
     'DTQW Cycle QNN Documentation',
     author,
     'dtqw_cycle_qnn',
     'Quantum walk neural networks on a cycle.',
     'Science'),
]



