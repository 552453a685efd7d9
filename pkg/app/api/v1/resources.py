from fastapi import APIRouter, HTTPException

from ...core.errors import QConvError
from ...models.tensor import ConvShape
from ...schemas.engine import ResourceReport, ResourcesRequest
from ...services import runs
from ...services.engine import resource_report

router = APIRouter(prefix="/resources", tags=["resources"])


@router.post("", response_model=ResourceReport)
def resources(payload: ResourcesRequest):
    try:
        shape = ConvShape(
            N=payload.N, H=payload.H, W=payload.W, C=payload.C,
            R=payload.R, S=payload.S, M=payload.M,
            stride_h=payload.stride, stride_w=payload.stride,
            pad_h=payload.pad, pad_w=payload.pad,
        )
        # a seed is only needed to build a sampled plan; nothing is drawn here
        cfg = runs.build_config(
            shape,
            mode=payload.mode,
            shots=payload.shots,
            epsilon=payload.epsilon,
            delta=payload.delta,
            seed=0 if payload.mode == "sampled" else None,
            strategy=payload.strategy,
            parallel_units=payload.parallel_units,
        )
        return resource_report(shape, cfg, copies=payload.copies)
    except QConvError as e:
        raise HTTPException(e.http_status, str(e))
