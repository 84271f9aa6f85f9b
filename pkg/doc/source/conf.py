# -*- coding: utf-8 -*-
#
# RecipNet documentation build configuration file
import sys
import os
import sphinx_rtd_theme

package_path = os.path.abspath(
    os.path.join(os.path.dirname(os.path.abspath(__file__)), '..', '..'))
sys.path.insert(0, package_path)

import recipnet.cmd  # @IgnorePep8 @UnusedImport

# -- General configuration ------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.intersphinx',
    'sphinx.ext.mathjax',
    'sphinx.ext.viewcode',
    'sphinx.ext.napoleon',
    'sphinx.ext.autosectionlabel',
    'sphinxarg.ext',
    'numpydoc'
]

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = u'RecipNet'
copyright = u'2026, The RecipNet Team'
author = u'The RecipNet Team'

version = '0.1'
release = '0.1.0'

language = None
exclude_patterns = []
pygments_style = 'sphinx'

# -- Options for HTML output ----------------------------------------------

html_theme = 'sphinx_rtd_theme'
html_theme_path = [sphinx_rtd_theme.get_html_theme_path()]
html_static_path = ['_static']
htmlhelp_basename = 'RecipNetdoc'

man_pages = [
    (master_doc, 'recipnet', u'RecipNet Documentation',
     [author], 1)
]

intersphinx_mapping = {'https://docs.python.org/': None,
                       'https://docs.scipy.org/doc/numpy/': None}

numpydoc_show_class_members = False
