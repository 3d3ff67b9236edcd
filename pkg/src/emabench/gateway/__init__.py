"""Wire API and command-line driver over the workbench."""
