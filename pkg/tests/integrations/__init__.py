"""
Integration tests for alsim file formats.
""" 