from Utils.errors import NoTargetStructure
from volume.types import LabelVolume, TissueLabel


def has_structure(vol: LabelVolume, label: int) -> bool:
    return bool((vol.voxels == int(label)).any())


def require_structure(vol: LabelVolume, *labels: int, operation: str = "") -> None:
    """Raise NoTargetStructure naming the first label with no voxels."""
    for label in labels:
        if not has_structure(vol, label):
            name = TissueLabel(int(label)).name
            raise NoTargetStructure(f"{operation or 'transform'}: no {name} voxels in volume")

