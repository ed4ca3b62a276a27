# Test package for a2im.
