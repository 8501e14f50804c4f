"""
API app for Django Ninja integration.
"""
