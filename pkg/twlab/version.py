"""Version metadata for setup.py and everything else to import."""

__appname__ = "Tweedie Ranking Lab"
__author__ = "twlab contributors"
__version__ = "0.3"
__license__ = "GNU GPL 2 or later"
