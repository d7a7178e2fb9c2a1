from .encode import EncodingMap, PrepareReport, prepare
from .ingest import RawTable, load_csv
from .resample import ResamplePlan, SplitSpec, hybrid_resample, stratified_split
from .scale import ScalerParams, apply_scaler, fit_scaler
from .synth import generate_synthetic

__all__ = [
    "EncodingMap",
    "PrepareReport",
    "RawTable",
    "ResamplePlan",
    "ScalerParams",
    "SplitSpec",
    "apply_scaler",
    "fit_scaler",
    "generate_synthetic",
    "hybrid_resample",
    "load_csv",
    "prepare",
    "stratified_split",
]
