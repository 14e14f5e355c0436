"""Two-layer reversible data hiding in the MSB planes of grayscale images."""

from .auxinfo import AUX_BITS, AuxInfo, read_aux, write_aux
from .cells import (
    CellMap,
    Neighborhood,
    PredictorPair,
    classify_cells,
    local_complexity,
    neighborhood,
    predictor_pair,
    sort_by_complexity,
)
from .layers import embed_layer1, embed_layer2, extract_layer1, extract_layer2
from .locmap import LocationMap, compress_map, decompress_map, preprocess, undo_preprocess
from .scheme import EmbedConfig, EmbedRecord, ExtractResult, embed, extract, extract_partial, psnr

__all__ = [
    "AUX_BITS", "AuxInfo", "CellMap", "EmbedConfig", "EmbedRecord", "ExtractResult", "LocationMap",
    "Neighborhood", "PredictorPair", "classify_cells", "compress_map", "decompress_map", "embed",
    "embed_layer1", "embed_layer2", "extract", "extract_layer1", "extract_layer2", "extract_partial",
    "local_complexity", "neighborhood", "predictor_pair", "preprocess", "psnr", "read_aux",
    "sort_by_complexity", "undo_preprocess", "write_aux",
]
