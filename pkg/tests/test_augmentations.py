import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st
from hypothesis.extra.numpy import arrays
from scipy import ndimage

from Utils.errors import NoTargetStructure
from augmentations import (cc_kink, cc_thickening, cc_thinning, complete_agenesis, cortex_smoothing,
                           cortex_thickening, cortex_thinning, kink_field, partial_agenesis,
                           posterior_fossa_hypoplasia, ventricle_field, ventriculomegaly)
from augmentations.callosum import kink_margin, removed_slices
from augmentations.plan import TRANSFORMS
from augmentations.ventricles import REACH_SIGMAS
from biomarkers import cc_length
from volume.distance import box_of
from volume.morphology import dilate_array
from volume.topology import count_components
from volume.types import Sphere, TissueLabel

from .conftest import cc_slab, labels, seeded_phantom

BG, CSF, GM, WM, VM, CBM, SGM, BSM, CC = range(9)


def _changed(before, after):
    return before.voxels != after.voxels


def _census_delta(before, after):
    return {name: after.census()[name] - count for name, count in before.census().items()}


# ---------------------------------------------------------------------------
# Corpus callosum
# ---------------------------------------------------------------------------

def test_complete_agenesis_moves_cc_to_ventricle(phantom):
    out = complete_agenesis(phantom)
    delta = _census_delta(phantom, out)
    assert out.count(CC) == 0
    assert delta["VM"] == phantom.count(CC)
    assert all(v == 0 for k, v in delta.items() if k not in ("CC", "VM"))


def test_transforms_need_their_structure(slab):
    no_cc = complete_agenesis(slab)
    for transform, args in [(complete_agenesis, ()), (partial_agenesis, (0.5, "anterior")),
                            (cc_thinning, (1,)), (cc_thickening, (1,)), (cc_kink, (1.0, 1.0))]:
        with pytest.raises(NoTargetStructure, match="no CC voxels"):
            transform(no_cc, *args)


def test_removed_slice_count():
    assert removed_slices(40, 0.25) == 10
    assert removed_slices(10, 0.5) == 5
    assert removed_slices(10, 0.95) == 9
    assert removed_slices(1, 0.5) == 0


def test_partial_agenesis_anterior_end(slab):
    out = partial_agenesis(slab, 0.5, "anterior")
    y = np.flatnonzero((out.voxels == CC).any(axis=(0, 2)))
    # CC spans y 5..14 on an RAS grid; the high-y half is anterior
    assert (y.min(), y.max()) == (5, 9)
    assert out.count(VM) == slab.count(CC) - out.count(CC)


def test_partial_agenesis_follows_orientation():
    flipped = labels(cc_slab().voxels, orientation=("R", "P", "S"))
    out = partial_agenesis(flipped, 0.5, "anterior")
    y = np.flatnonzero((out.voxels == CC).any(axis=(0, 2)))
    assert (y.min(), y.max()) == (10, 14)


def test_partial_agenesis_single_slice_is_identity():
    vol = cc_slab(cc_box=(slice(4, 8), slice(7, 8), slice(5, 8)))
    out = partial_agenesis(vol, 0.8, "posterior")
    np.testing.assert_array_equal(out.voxels, vol.voxels)


def test_partial_agenesis_rejects_bad_arguments(slab):
    with pytest.raises(ValueError):
        partial_agenesis(slab, 0.0, "anterior")
    with pytest.raises(ValueError):
        partial_agenesis(slab, 0.5, "superior")


def test_partial_agenesis_halves_phantom_length(phantom):
    s = phantom.spacing[1]
    extent = int(round(cc_length(phantom)[0] / s)) + 1
    length, flag = cc_length(partial_agenesis(phantom, 0.5, "posterior"))
    kept = extent - math.ceil(0.5 * extent)
    assert flag is None
    assert (kept - 1) * s - 1e-9 <= length <= (kept + 1) * s + 1e-9


def test_thinning_erodes_vertically(slab):
    # CC is 3 voxels thick along IS; one iteration leaves the middle sheet
    out = cc_thinning(slab, 1)
    z = np.flatnonzero((out.voxels == CC).any(axis=(0, 1)))
    assert list(z) == [6]
    assert out.count(WM) - slab.count(WM) == slab.count(CC) - out.count(CC)


def test_thinning_never_empties_the_cc(slab):
    once = cc_thinning(slab, 1)
    np.testing.assert_array_equal(cc_thinning(slab, 3).voxels, once.voxels)


def test_thinning_and_thickening_are_monotone(phantom):
    cc = phantom.voxels == CC
    thin = cc_thinning(phantom, 2).voxels == CC
    thick = cc_thickening(phantom, 2).voxels == CC
    assert thin.any() and not (thin & ~cc).any()
    assert not (cc & ~thick).any()


def test_thickening_grows_only_into_white_matter(phantom):
    out = cc_thickening(phantom, 2)
    changed = _changed(phantom, out)
    assert out.count(CC) > phantom.count(CC)
    assert (phantom.voxels[changed] == WM).all()
    assert out.count(GM) == phantom.count(GM)
    assert out.count(CSF) == phantom.count(CSF)


def test_kink_with_zero_amplitude_is_identity(phantom):
    np.testing.assert_array_equal(cc_kink(phantom, 0.0, 1.0).voxels, phantom.voxels)


def test_kink_preserves_cc_size_and_length(phantom):
    out = cc_kink(phantom, 1.0, 1.0, phase=0.3)
    assert abs(out.count(CC) - phantom.count(CC)) <= 0.1 * phantom.count(CC)
    assert abs(cc_length(out)[0] - cc_length(phantom)[0]) <= phantom.spacing[1] + 1e-9


def test_kink_is_local(phantom):
    amplitude = 2.0
    out = cc_kink(phantom, amplitude, 1.0)
    window = box_of(phantom.voxels == CC).slices(margin=kink_margin(amplitude, phantom.spacing),
                                                 dims=phantom.dims)
    outside = np.ones(phantom.dims, dtype=bool)
    outside[window] = False
    np.testing.assert_array_equal(out.voxels[outside], phantom.voxels[outside])


def test_kink_field_is_bounded_and_smooth(phantom):
    amplitude, cycles = 2.0, 1.5
    field = kink_field(phantom, amplitude, cycles, phase=0.0)
    field.validate()
    extent = box_of(phantom.voxels == CC).extent(1)
    margin = kink_margin(amplitude, phantom.spacing)
    step = amplitude * (2 * np.pi * cycles / extent + np.pi / (2 * margin))
    for axis in range(3):
        jump = np.abs(np.diff(field.vectors.astype(np.float64), axis=axis)).max()
        assert jump <= step + 1e-5
    # displacement only along inferior-superior
    assert not field.vectors[..., :2].any()


# ---------------------------------------------------------------------------
# Cortex
# ---------------------------------------------------------------------------

def test_cortex_thickening_trades_wm_for_gm(phantom):
    out = cortex_thickening(phantom, 1)
    delta = _census_delta(phantom, out)
    assert delta["GM"] > 0
    assert delta["GM"] == -delta["WM"]
    assert all(v == 0 for k, v in delta.items() if k not in ("GM", "WM"))


def test_cortex_thinning_sandwich():
    v = np.zeros((9, 6, 6), dtype=np.uint8)
    v[0:3], v[3:6], v[6:9] = CSF, GM, WM
    vol = labels(v)
    out = cortex_thinning(vol, 1)
    delta = _census_delta(vol, out)
    assert delta["CSF"] == 36
    assert delta["GM"] == -36
    assert delta["WM"] == 0


def test_cortex_thinning_needs_csf():
    vol = labels(np.full((4, 4, 4), GM))
    with pytest.raises(NoTargetStructure, match="no CSF voxels"):
        cortex_thinning(vol, 1)


tissue = arrays(np.uint8, (7, 7, 7), elements=st.sampled_from([CSF, GM, WM]))


@settings(max_examples=40, deadline=None)
@given(tissue)
def test_cortex_thinning_only_takes_gm_next_to_csf(v):
    assume((v == CSF).any() and (v == GM).any())
    vol = labels(v)
    out = cortex_thinning(vol, 1)
    changed = _changed(vol, out)
    near_csf = dilate_array(v == CSF, Sphere(1).footprint())
    assert (v[changed] == GM).all()
    assert (out.voxels[changed] == CSF).all()
    assert near_csf[changed].all()


def test_cortex_smoothing_fills_a_sulcus():
    v = np.full((9, 9, 9), CSF, dtype=np.uint8)
    v[1:8, 1:8, 1:6] = GM
    v[4, 1:8, 3:6] = CSF
    vol = labels(v)
    out = cortex_smoothing(vol, 1)
    assert (out.voxels[4, 2:7, 3:5] == GM).all()
    assert (out.voxels[4, 2:7, 5] == CSF).all()
    changed = _changed(vol, out)
    assert (v[changed] == CSF).all()
    assert (out.voxels[changed] == GM).all()


def test_cortex_smoothing_on_phantom(phantom):
    out = cortex_smoothing(phantom, 1)
    changed = _changed(phantom, out)
    assert (phantom.voxels[changed] == CSF).all()
    assert out.count(WM) == phantom.count(WM)


# ---------------------------------------------------------------------------
# Posterior fossa
# ---------------------------------------------------------------------------

def _bridged_fossa():
    v = np.zeros((19, 14, 9), dtype=np.uint8)
    v[2:7, 2:7, 2:7] = CBM
    v[12:17, 2:7, 2:7] = CBM
    v[7:12, 4, 4] = CBM  # one-voxel bridge between the two lobes
    v[2:7, 7:12, 2:7] = BSM
    return labels(v)


def test_hypoplasia_guard_keeps_a_bridged_cerebellum():
    vol = _bridged_fossa()
    out = posterior_fossa_hypoplasia(vol, 1)
    np.testing.assert_array_equal(out.voxels == CBM, vol.voxels == CBM)
    bsm = out.voxels == BSM
    assert bsm.sum() == 3 * 4 * 3
    assert bsm[3:6, 7:11, 3:6].all()
    assert out.count(CSF) == vol.count(BSM) - out.count(BSM)


def test_hypoplasia_on_phantom(phantom):
    out = posterior_fossa_hypoplasia(phantom, 2)
    assert out.count(CBM) <= phantom.count(CBM)
    assert out.count(BSM) <= phantom.count(BSM)
    assert out.count(CBM) + out.count(BSM) < phantom.count(CBM) + phantom.count(BSM)
    for code in (CBM, BSM):
        assert count_components(out.voxels == code, 26) == 1
    touching = ndimage.binary_dilation(out.voxels == CBM, structure=np.ones((3, 3, 3), bool))
    assert (touching & (out.voxels == BSM)).any()


def test_hypoplasia_zero_iterations_is_identity(phantom):
    np.testing.assert_array_equal(posterior_fossa_hypoplasia(phantom, 0).voxels, phantom.voxels)


# ---------------------------------------------------------------------------
# Ventricles
# ---------------------------------------------------------------------------

def test_ventriculomegaly_enlarges_ventricles(phantom):
    for laterality in ("left", "right", "bilateral"):
        out = ventriculomegaly(phantom, 3.0, 6.0, laterality)
        assert out.count(VM) > phantom.count(VM)


def test_ventriculomegaly_is_local(phantom):
    sigma = 4.0
    field = ventricle_field(phantom, 3.0, sigma, "bilateral")
    field.validate()
    out = ventriculomegaly(phantom, 3.0, sigma, "bilateral")
    still = np.all(field.vectors == 0, axis=-1)
    np.testing.assert_array_equal(out.voxels[still], phantom.voxels[still])
    assert np.count_nonzero(~still) < phantom.voxels.size


def test_ventricle_field_vanishes_beyond_reach(phantom):
    sigma = 4.0
    field = ventricle_field(phantom, 3.0, sigma, "left")
    moving = np.argwhere(np.any(field.vectors != 0, axis=-1)) * np.asarray(phantom.spacing)
    centroid = moving.mean(axis=0)
    assert np.linalg.norm(moving - centroid, axis=1).max() <= 2 * REACH_SIGMAS * sigma


def test_ventriculomegaly_zero_magnitude_is_identity(phantom):
    np.testing.assert_array_equal(ventriculomegaly(phantom, 0.0, 6.0, "bilateral").voxels, phantom.voxels)


def test_ventriculomegaly_needs_a_ventricle_on_the_chosen_side():
    v = np.full((12, 6, 6), WM, dtype=np.uint8)
    v[8:10, 2:4, 2:4] = VM  # right hemisphere only on an RAS grid
    vol = labels(v)
    assert ventriculomegaly(vol, 1.0, 2.0, "right").count(VM) >= vol.count(VM)
    with pytest.raises(NoTargetStructure, match="left hemisphere"):
        ventriculomegaly(vol, 1.0, 2.0, "left")
    with pytest.raises(ValueError):
        ventriculomegaly(vol, 1.0, 2.0, "both")


# ---------------------------------------------------------------------------
# Every transform over seeded phantoms
# ---------------------------------------------------------------------------

PHANTOM_SEEDS = range(20)

ACTIVE_PARAMS = {
    "complete_agenesis": {},
    "partial_agenesis": dict(fraction=0.5, end="posterior"),
    "cc_thinning": dict(iterations=2),
    "cc_thickening": dict(radius=2),
    "cc_kink": dict(amplitude_mm=1.0, cycles=1.0, phase=0.3),
    "cortex_thickening": dict(radius=1),
    "cortex_thinning": dict(radius=1),
    "cortex_smoothing": dict(radius=1),
    "posterior_fossa_hypoplasia": dict(iterations=2),
    "ventriculomegaly": dict(magnitude_mm=3.0, sigma_mm=6.0, laterality="bilateral"),
}

# complete agenesis has no severity parameter
IDENTITY_PARAMS = {
    "partial_agenesis": dict(fraction=1e-12, end="anterior"),  # rounds to zero slices
    "cc_thinning": dict(iterations=0),
    "cc_thickening": dict(radius=0),
    "cc_kink": dict(amplitude_mm=0.0, cycles=1.0, phase=0.3),
    "cortex_thickening": dict(radius=0),
    "cortex_thinning": dict(radius=0),
    "cortex_smoothing": dict(radius=0),
    "posterior_fossa_hypoplasia": dict(iterations=0),
    "ventriculomegaly": dict(magnitude_mm=0.0, sigma_mm=6.0, laterality="bilateral"),
}

# label changes each transform may make: (before, after)
ALLOWED_CHANGES = {
    "complete_agenesis": {(CC, VM)},
    "partial_agenesis": {(CC, VM)},
    "cc_thinning": {(CC, WM)},
    "cc_thickening": {(WM, CC)},
    "cortex_thickening": {(WM, GM)},
    "cortex_thinning": {(GM, CSF)},
    "cortex_smoothing": {(CSF, GM)},
    "posterior_fossa_hypoplasia": {(CBM, CSF), (BSM, CSF)},
}

MUST_CHANGE = {"complete_agenesis", "partial_agenesis", "cc_thinning", "cc_thickening",
               "cortex_thickening", "cortex_thinning", "ventriculomegaly"}


def test_parameter_tables_cover_every_transform():
    assert set(ACTIVE_PARAMS) == set(TRANSFORMS)
    assert set(IDENTITY_PARAMS) == set(TRANSFORMS) - {"complete_agenesis"}


def _unchanged_outside(kind, before, after, params):
    if kind == "cc_kink":
        window = box_of(before.voxels == CC).slices(
            margin=kink_margin(params["amplitude_mm"], before.spacing), dims=before.dims)
        still = np.ones(before.dims, dtype=bool)
        still[window] = False
    else:
        field = ventricle_field(before, params["magnitude_mm"], params["sigma_mm"], params["laterality"])
        still = np.all(field.vectors == 0, axis=-1)
    np.testing.assert_array_equal(after.voxels[still], before.voxels[still])


@pytest.mark.parametrize("seed", PHANTOM_SEEDS)
@pytest.mark.parametrize("kind", sorted(TRANSFORMS))
def test_transform_contract_on_seeded_phantoms(kind, seed):
    before = seeded_phantom(seed)
    params = ACTIVE_PARAMS[kind]
    after = TRANSFORMS[kind](before, **params)

    assert after.same_grid(before)
    assert after.voxels.dtype == np.uint8
    assert set(np.unique(after.voxels)) <= set(np.unique(before.voxels))
    changed = _changed(before, after)
    if kind in MUST_CHANGE:
        assert changed.any()

    if kind in ALLOWED_CHANGES:
        moves = set(zip(before.voxels[changed].tolist(), after.voxels[changed].tolist()))
        assert moves <= ALLOWED_CHANGES[kind]
    else:
        _unchanged_outside(kind, before, after, params)

    cc_before, cc_after = before.voxels == CC, after.voxels == CC
    if kind == "complete_agenesis":
        assert _census_delta(before, after)["CC"] == -_census_delta(before, after)["VM"]
        assert not cc_after.any()
    elif kind in ("partial_agenesis", "cc_thinning"):
        assert cc_after.any() and not (cc_after & ~cc_before).any()
    elif kind == "cc_thickening":
        assert not (cc_before & ~cc_after).any()
    elif kind == "cortex_thickening":
        assert _census_delta(before, after)["GM"] == -_census_delta(before, after)["WM"]
    elif kind == "cc_kink":
        assert abs(after.count(CC) - before.count(CC)) <= 0.1 * before.count(CC)
    elif kind == "posterior_fossa_hypoplasia":
        for code in (CBM, BSM):
            assert count_components(after.voxels == code, 26) == 1
    elif kind == "ventriculomegaly":
        assert after.count(VM) > before.count(VM)


@pytest.mark.parametrize("seed", PHANTOM_SEEDS)
@pytest.mark.parametrize("kind", sorted(IDENTITY_PARAMS))
def test_zero_severity_is_identity(kind, seed):
    before = seeded_phantom(seed)
    after = TRANSFORMS[kind](before, **IDENTITY_PARAMS[kind])
    np.testing.assert_array_equal(after.voxels, before.voxels)
    assert after.same_grid(before)
