"""Star (S3) decompositions and (3,0)-orientations of random 4-regular graphs."""
__version__ = "0.1.0"
