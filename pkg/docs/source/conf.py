import importlib.metadata
import os
import sys

qisosm_path = os.path.join(os.path.dirname(__file__), '../..')
qisosm_path = os.path.abspath(qisosm_path)
sys.path.insert(0, qisosm_path)


def get_version():
    """Return the version of the installed package."""

    try:
        return importlib.metadata.version('qisosm')
    except importlib.metadata.PackageNotFoundError:
        sys.exit('Unable to get package version, is qisosm installed?')


project = 'qisosm'
copyright = '2026, The qisosm developers'
author = 'The qisosm developers'
release = get_version()

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.intersphinx',
    'sphinx.ext.mathjax',
    'sphinx.ext.viewcode',
    'sphinx_autodoc_typehints',
]

intersphinx_mapping = {
    'python': ('https://docs.python.org/3/', None),
    'numpy': ('https://numpy.org/doc/stable/', None),
    'scipy': ('https://docs.scipy.org/doc/scipy/', None),
}

exclude_patterns = []
html_static_path = ['_static']
html_theme = 'alabaster'
html_theme_options = {
    'description': 'Quantum isometries of the finite spectral triple of the Standard Model.',
    'sidebar_collapse': False,
    'page_width': '80%',
    'body_max_width': '80%',
}
templates_path = ['_templates']
