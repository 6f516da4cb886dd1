"""
infoattack utilities: file I/O, run manifests and timestamps
"""
