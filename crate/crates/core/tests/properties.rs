//! Property suite over random small even lattices and sublattices of E8.

mod common;

use common::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(config())]

    #[test]
    fn double_complement(input in lattice_with_rows()) {
        double_complement_is_saturation(input)?;
    }

    #[test]
    fn complements_in_e8(rows in e8_rows()) {
        complements_in_e8_have_equal_det_and_glue_index(rows)?;
    }

    #[test]
    fn complement_forms(rows in e8_rows()) {
        complement_discriminant_forms_are_anti_isometric(rows)?;
    }

    #[test]
    fn milgram(g in even_gram()) {
        milgram_residue_is_rank_mod_8(g)?;
    }

    #[test]
    fn short_vectors(input in (even_gram(), 0i64..=16)) {
        short_vectors_match_box_search(input)?;
    }

    #[test]
    fn isometries(input in gram_and_unimodular()) {
        isometries_verify_exactly(input)?;
    }

    #[test]
    fn scaled_not_isometric(g in even_gram()) {
        non_isometric_lattices_are_rejected(g)?;
    }
}
