"""eegres - resolution-balanced EEG feature extraction and classification.

Extracts feature tensors whose spectral, temporal and spatial resolutions
share a fixed feature budget, and maps cross-validated SVM accuracy over
every feasible resolution configuration:
- Bundle I/O, block-mean decimation and fixed-window partitioning
- Synthetic datasets with planted spectral, spatial or temporal effects
- Per-segment Hanning-windowed power spectral densities
- Temporal group-average pooling
- Graph pooling via spectral clustering of functional connectivity
- RBF-kernel SVM trained by sequential minimal optimization
- Subject-grouped k-fold cross-validation and triangle-edge reports

Usage:
    # Generate a synthetic dataset
    eegres synth --spec spec.json --out data/synth

    # Sweep every configuration with a budget of 60 features
    eegres sweep --bundle data/synth --budget 60 --out results/synth

    # Accuracy along the triangle edges
    eegres edge --result results/synth/sweep.json --out edge.csv
"""

__version__ = "0.1.0"
__author__ = "Anton"
__app_name__ = "eegres"
