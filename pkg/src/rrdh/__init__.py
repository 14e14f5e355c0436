"""Two-layer MSB reversible data hiding, a JPEG attack channel, and robustness experiments."""

from .corpus import GrayImage, gen_secret, load_pgm, save_pgm, synth_image
from .rdh import EmbedConfig, embed, extract

__version__ = "0.1.0"
