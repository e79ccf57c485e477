/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_scene_free: (a: number, b: number) => void;
export const __wbg_segmentation_free: (a: number, b: number) => void;
export const profile_response: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const scene_height: (a: number) => number;
export const scene_image_rgba: (a: number) => [number, number];
export const scene_new: (a: number, b: number, c: number) => [number, number, number];
export const scene_segment: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const scene_truth_rgba: (a: number) => [number, number];
export const scene_width: (a: number) => number;
export const segmentation_acc: (a: number) => number;
export const segmentation_mask_rgba: (a: number) => [number, number];
export const segmentation_overlay_rgba: (a: number) => [number, number];
export const segmentation_phi_rgba: (a: number) => [number, number];
export const segmentation_probe_widths: (a: number) => [number, number];
export const segmentation_probes_used: (a: number) => number;
export const segmentation_se: (a: number) => number;
export const segmentation_sp: (a: number) => number;
export const segmentation_vesselness_rgba: (a: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
