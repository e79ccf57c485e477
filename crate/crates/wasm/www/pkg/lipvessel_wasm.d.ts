/* tslint:disable */
/* eslint-disable */

/**
 * A generated fundus-like image with its ground truth.
 */
export class Scene {
    free(): void;
    [Symbol.dispose](): void;
    height(): number;
    image_rgba(): Uint8Array;
    /**
     * `lighting` is a LIP constant: positive darkens, negative brightens.
     */
    constructor(size: number, seed: number, lighting: number);
    /**
     * Runs the full pipeline with the given FOV mask of the scene.
     */
    segment(fov_angle: number, max_probes: number, orientations: number, area_fraction: number): Segmentation;
    truth_rgba(): Uint8Array;
    width(): number;
}

export class Segmentation {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    acc(): number;
    mask_rgba(): Uint8Array;
    overlay_rgba(): Uint8Array;
    phi_rgba(): Uint8Array;
    probe_widths(): Float64Array;
    probes_used(): number;
    se(): number;
    sp(): number;
    vesselness_rgba(): Uint8Array;
}

/**
 * Detector response of a 3-point probe along a profile; NaN where the
 * probe does not fit.
 */
export function profile_response(profile: Float64Array, side: number, center: number, half_width: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_scene_free: (a: number, b: number) => void;
    readonly __wbg_segmentation_free: (a: number, b: number) => void;
    readonly profile_response: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly scene_height: (a: number) => number;
    readonly scene_image_rgba: (a: number) => [number, number];
    readonly scene_new: (a: number, b: number, c: number) => [number, number, number];
    readonly scene_segment: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly scene_truth_rgba: (a: number) => [number, number];
    readonly scene_width: (a: number) => number;
    readonly segmentation_acc: (a: number) => number;
    readonly segmentation_mask_rgba: (a: number) => [number, number];
    readonly segmentation_overlay_rgba: (a: number) => [number, number];
    readonly segmentation_phi_rgba: (a: number) => [number, number];
    readonly segmentation_probe_widths: (a: number) => [number, number];
    readonly segmentation_probes_used: (a: number) => number;
    readonly segmentation_se: (a: number) => number;
    readonly segmentation_sp: (a: number) => number;
    readonly segmentation_vesselness_rgba: (a: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
