"""Newton strata and twisted cocenters of extended affine Weyl groups."""
