"""Strict NIfTI-1 single-file codec (uint8 labels, float32 intensities,
axis-aligned affines) and the raw CMV1 test format."""
import gzip
import struct
from typing import Union

import nibabel as nib
import numpy as np
from nibabel.orientations import aff2axcodes

from Utils.errors import (LabelOutOfRange, MalformedHeader, ObliqueAffine,
                          UnsupportedDatatype, VolumeReadError, VolumeWriteError)
from logger import get_logger
from volume.types import (MAX_LABEL, Grid, IntensityVolume, LabelVolume, Orientation,
                          RawLabelVolume)

logger = get_logger(__name__)

HEADER_SIZE = 348
VOX_OFFSET = 352
GZIP_MAGIC = b"\x1f\x8b"
NIFTI_MAGIC = b"n+1"
DATATYPE_UINT8 = 2
DATATYPE_FLOAT32 = 16
OBLIQUE_TOLERANCE = 1e-3

RAW_MAGIC = b"CMV1"

_AXIS_ROW = {"R": (0, 1.0), "L": (0, -1.0), "A": (1, 1.0), "P": (1, -1.0), "S": (2, 1.0), "I": (2, -1.0)}

Volume = Union[LabelVolume, IntensityVolume]


# ---------------------------------------------------------------------------
# Header helpers
# ---------------------------------------------------------------------------

def orientation_affine(grid: Grid) -> np.ndarray:
    """Axis-aligned affine for the grid, with world origin at the grid center."""
    affine = np.eye(4)
    affine[:3, :3] = 0.0
    for column, (code, spacing) in enumerate(zip(grid.orientation, grid.spacing)):
        row, sign = _AXIS_ROW[code]
        affine[row, column] = sign * spacing
    center = (np.array(grid.dims, dtype=np.float64) - 1.0) / 2.0
    affine[:3, 3] = -affine[:3, :3] @ center
    return affine


def orientation_from_affine(affine: np.ndarray) -> Orientation:
    """Reduce an affine to axis codes, rejecting oblique volumes."""
    rotation = np.asarray(affine, dtype=np.float64)[:3, :3]
    for column in range(3):
        magnitudes = np.sort(np.abs(rotation[:, column]))
        if magnitudes[-1] == 0 or magnitudes[-2] > OBLIQUE_TOLERANCE * magnitudes[-1]:
            raise ObliqueAffine(f"affine column {column} is not axis-aligned: {rotation[:, column]}")
    codes = aff2axcodes(affine)
    if None in codes or len({_AXIS_ROW[c][0] for c in codes}) != 3:
        raise ObliqueAffine(f"affine does not map grid axes to distinct anatomical axes: {codes}")
    return tuple(codes)  # type: ignore[return-value]


def build_header(vol: Volume) -> nib.Nifti1Header:
    header = nib.Nifti1Header(endianness="<")
    header.set_data_shape(vol.dims)
    header.set_data_dtype(np.uint8 if isinstance(vol, (LabelVolume, RawLabelVolume)) else np.float32)
    affine = orientation_affine(vol)
    header.set_qform(affine, code=1)
    header.set_sform(affine, code=1)
    header.set_zooms(vol.spacing)
    header.set_xyzt_units("mm")
    header["scl_slope"] = 1.0
    header["scl_inter"] = 0.0
    header["vox_offset"] = VOX_OFFSET
    header["descrip"] = vol.description.encode("ascii", "replace")[:79]
    return header


# ---------------------------------------------------------------------------
# NIfTI-1
# ---------------------------------------------------------------------------

def encode_volume(vol: Volume) -> bytes:
    header = build_header(vol)
    dtype = header.get_data_dtype()
    payload = np.asarray(vol.voxels, dtype=dtype).tobytes(order="F")
    # four zero bytes: no header extensions
    return header.binaryblock + b"\x00" * (VOX_OFFSET - HEADER_SIZE) + payload


def write_volume(vol: Volume, path: str, compress: bool = None) -> None:
    if compress is None:
        compress = str(path).endswith(".gz")
    data = encode_volume(vol)
    try:
        with open(path, "wb") as handle:
            if compress:
                # mtime=0 and no embedded file name keep compressed output byte-identical
                with gzip.GzipFile(filename="", mode="wb", fileobj=handle, mtime=0) as zipped:
                    zipped.write(data)
            else:
                handle.write(data)
    except OSError as e:
        logger.error(f"Failed to write volume to {path}: {e}")
        raise VolumeWriteError(f"cannot write {path}: {e}")
    logger.info(f"Wrote {type(vol).__name__} {vol.dims} to {path}")


def _read_bytes(path: str) -> bytes:
    try:
        with open(path, "rb") as handle:
            data = handle.read()
    except OSError as e:
        raise VolumeReadError(f"cannot read {path}: {e}")
    if data[:2] == GZIP_MAGIC:
        try:
            data = gzip.decompress(data)
        except (OSError, EOFError) as e:
            raise MalformedHeader(f"{path}: corrupt gzip stream: {e}")
    return data


def decode_volume(data: bytes, raw_codes: bool = False, source: str = "<bytes>"):
    if len(data) < HEADER_SIZE:
        raise MalformedHeader(f"{source}: file shorter than a NIfTI-1 header")
    try:
        header = nib.Nifti1Header(data[:HEADER_SIZE], check=False)
    except Exception as e:
        raise MalformedHeader(f"{source}: unreadable header: {e}")
    if int(header["sizeof_hdr"]) != HEADER_SIZE or header["magic"].item().rstrip(b"\x00") != NIFTI_MAGIC:
        raise MalformedHeader(f"{source}: not a single-file NIfTI-1 image")

    datatype = int(header["datatype"])
    if datatype not in (DATATYPE_UINT8, DATATYPE_FLOAT32):
        raise UnsupportedDatatype(f"{source}: datatype code {datatype} is not uint8 or float32")

    shape = header.get_data_shape()
    if len(shape) < 3 or any(n != 1 for n in shape[3:]):
        raise MalformedHeader(f"{source}: expected a 3D volume, got shape {shape}")
    dims = tuple(int(n) for n in shape[:3])
    spacing = tuple(float(z) for z in header.get_zooms()[:3])
    orientation = orientation_from_affine(header.get_best_affine())

    offset = int(header["vox_offset"])
    dtype = header.get_data_dtype()
    count = int(np.prod(dims))
    if offset < HEADER_SIZE or len(data) < offset + count * dtype.itemsize:
        raise MalformedHeader(f"{source}: payload truncated")
    voxels = np.frombuffer(data, dtype=dtype, count=count, offset=offset).reshape(dims, order="F")
    description = header["descrip"].item().rstrip(b"\x00").decode("ascii", "replace")
    meta = dict(spacing=spacing, orientation=orientation, description=description)

    if datatype == DATATYPE_FLOAT32:
        slope, inter = header.get_slope_inter()
        values = voxels.astype(np.float32)
        if slope is not None and (slope != 1.0 or (inter or 0.0) != 0.0):
            values = values * np.float32(slope) + np.float32(inter or 0.0)
        return IntensityVolume(voxels=values, **meta)

    voxels = voxels.astype(np.uint8)
    if raw_codes:
        return RawLabelVolume(voxels=voxels, **meta)
    if voxels.size and int(voxels.max()) > MAX_LABEL:
        raise LabelOutOfRange(f"{source}: label code {int(voxels.max())} exceeds {MAX_LABEL}")
    return LabelVolume(voxels=voxels, **meta)


def read_volume(path: str, raw_codes: bool = False):
    """Read a .nii/.nii.gz file. uint8 files decode to LabelVolume (or
    RawLabelVolume with `raw_codes`), float32 files to IntensityVolume."""
    vol = decode_volume(_read_bytes(path), raw_codes=raw_codes, source=str(path))
    logger.info(f"Read {type(vol).__name__} {vol.dims} from {path}")
    return vol


def read_labels(path: str) -> LabelVolume:
    vol = read_volume(path)
    if not isinstance(vol, LabelVolume):
        raise UnsupportedDatatype(f"{path}: expected a uint8 label volume")
    return vol


# ---------------------------------------------------------------------------
# Raw test format: "CMV1" + 3 x uint32 LE dims + uint8 payload (x fastest)
# ---------------------------------------------------------------------------

def write_raw(vol: LabelVolume, path: str) -> None:
    try:
        with open(path, "wb") as handle:
            handle.write(RAW_MAGIC + struct.pack("<3I", *vol.dims))
            handle.write(vol.voxels.tobytes(order="F"))
    except OSError as e:
        raise VolumeWriteError(f"cannot write {path}: {e}")


def read_raw(path: str) -> LabelVolume:
    data = _read_bytes(path)
    if len(data) < 16 or data[:4] != RAW_MAGIC:
        raise MalformedHeader(f"{path}: missing CMV1 magic")
    dims = struct.unpack("<3I", data[4:16])
    count = int(np.prod(dims))
    if len(data) < 16 + count:
        raise MalformedHeader(f"{path}: payload truncated")
    voxels = np.frombuffer(data, dtype=np.uint8, count=count, offset=16).reshape(dims, order="F")
    if voxels.size and int(voxels.max()) > MAX_LABEL:
        raise LabelOutOfRange(f"{path}: label code {int(voxels.max())} exceeds {MAX_LABEL}")
    return LabelVolume(voxels=voxels.copy())
