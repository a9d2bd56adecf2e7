"""
KPP Front Lab Test Suite
"""
