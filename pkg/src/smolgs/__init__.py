"""smolgs: compression codec for 3D Gaussian-splat scenes.

Pipeline: occupancy-octree coordinate coding with canonical Huffman
compression, learned-step feature quantization priced by a Gaussian rate
model and coded with a carry-propagating range coder, an inference-only
neural attribute decoder, and a bit-exact container format.
"""

from .core import BoundingBox, CodecConfig, Splat, SplatCloud, tight_bounding_box
from .container import DecodedContainer, decode_container, encode_container, size_breakdown
from .fixtures import make_fixture
from .octree import (
    OctreeStream,
    build_octree,
    decode_octree,
    dequantize_index,
    occupancy_statistics,
    quantize_coordinate,
)
from .quant import StaticContext, fit_static_context, quantize, rate_report

__version__ = "0.1.0"

__all__ = [
    "BoundingBox",
    "CodecConfig",
    "DecodedContainer",
    "OctreeStream",
    "Splat",
    "SplatCloud",
    "StaticContext",
    "build_octree",
    "decode_container",
    "decode_octree",
    "dequantize_index",
    "encode_container",
    "fit_static_context",
    "make_fixture",
    "occupancy_statistics",
    "quantize",
    "quantize_coordinate",
    "rate_report",
    "size_breakdown",
    "tight_bounding_box",
]
