"""
Classical-quantum channel analytics package.

Provides the dense operator substrate, the channel model, capacity optimizers,
block-code decoders and their error bounds, reliability exponents, and the
random-coding simulator that the management commands expose.
"""
