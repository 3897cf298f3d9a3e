"""flexpose: upper-body motion capture from garment-mounted IMUs and elbow
flex sensors — synthetic data generation, displacement augmentation via a
latent diffusion generator, flex calibration, fusion pose prediction,
metrics, and a real-time streaming runtime."""

__version__ = "0.1.0"
