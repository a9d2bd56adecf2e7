"""
Unit tests for KPP Front Lab
"""
