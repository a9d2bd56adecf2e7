"""
Integration tests for KPP Front Lab
"""
