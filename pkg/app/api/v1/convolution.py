from fastapi import APIRouter, HTTPException

from ...core.errors import QConvError
from ...schemas.engine import QConvolveRequest
from ...schemas.tensor import ConvolveRequest, TensorPayload
from ...services import runs

router = APIRouter(prefix="/convolution", tags=["convolution"])


@router.post("/convolve", response_model=TensorPayload)
def convolve(payload: ConvolveRequest):
    try:
        y = runs.run_convolve(payload.input.to_array(), payload.kernel.to_array(),
                              payload.stride, payload.pad)
    except QConvError as e:
        raise HTTPException(e.http_status, str(e))
    return TensorPayload.from_array(y)


@router.post("/qconvolve")
def qconvolve(payload: QConvolveRequest):
    x, k = payload.input.to_array(), payload.kernel.to_array()
    try:
        shape = runs.make_shape(x, k, payload.stride, payload.pad)
        cfg = runs.build_config(
            shape,
            mode=payload.mode,
            shots=payload.shots,
            epsilon=payload.epsilon,
            delta=payload.delta,
            seed=payload.seed,
            circuit=payload.circuit,
            strategy=payload.strategy,
            parallel_units=payload.parallel_units,
            batched=payload.batched,
            entries=runs.encodable_entries(x, k, shape),
        )
        return runs.run_qconvolve(x, k, cfg, top_k=payload.top_k)
    except QConvError as e:
        raise HTTPException(e.http_status, str(e))
