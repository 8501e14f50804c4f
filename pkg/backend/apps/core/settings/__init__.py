# Settings package for Django configuration
