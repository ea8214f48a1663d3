ts v1 2 25
rule,tri,-1.5,-1,-0.5,tri,-1.5,-1,-0.5,0,0.30000000000000004,1.5
rule,tri,-1.5,-1,-0.5,tri,-1,-0.5,0,0,0.27500000000000002,1.375
rule,tri,-1.5,-1,-0.5,tri,-0.5,0,0.5,0,0.25,1.25
rule,tri,-1.5,-1,-0.5,tri,0,0.5,1,0,0.27500000000000002,1.375
rule,tri,-1.5,-1,-0.5,tri,0.5,1,1.5,0,0.30000000000000004,1.5
rule,tri,-1,-0.5,0,tri,-1.5,-1,-0.5,0,0.27500000000000002,1.375
rule,tri,-1,-0.5,0,tri,-1,-0.5,0,0,0.25,1.25
rule,tri,-1,-0.5,0,tri,-0.5,0,0.5,0,0.22500000000000001,1.125
rule,tri,-1,-0.5,0,tri,0,0.5,1,0,0.25,1.25
rule,tri,-1,-0.5,0,tri,0.5,1,1.5,0,0.27500000000000002,1.375
rule,tri,-0.5,0,0.5,tri,-1.5,-1,-0.5,0,0.25,1.25
rule,tri,-0.5,0,0.5,tri,-1,-0.5,0,0,0.22500000000000001,1.125
rule,tri,-0.5,0,0.5,tri,-0.5,0,0.5,0,0.20000000000000001,1
rule,tri,-0.5,0,0.5,tri,0,0.5,1,0,0.22500000000000001,1.125
rule,tri,-0.5,0,0.5,tri,0.5,1,1.5,0,0.25,1.25
rule,tri,0,0.5,1,tri,-1.5,-1,-0.5,0,0.27500000000000002,1.375
rule,tri,0,0.5,1,tri,-1,-0.5,0,0,0.25,1.25
rule,tri,0,0.5,1,tri,-0.5,0,0.5,0,0.22500000000000001,1.125
rule,tri,0,0.5,1,tri,0,0.5,1,0,0.25,1.25
rule,tri,0,0.5,1,tri,0.5,1,1.5,0,0.27500000000000002,1.375
rule,tri,0.5,1,1.5,tri,-1.5,-1,-0.5,0,0.30000000000000004,1.5
rule,tri,0.5,1,1.5,tri,-1,-0.5,0,0,0.27500000000000002,1.375
rule,tri,0.5,1,1.5,tri,-0.5,0,0.5,0,0.25,1.25
rule,tri,0.5,1,1.5,tri,0,0.5,1,0,0.27500000000000002,1.375
rule,tri,0.5,1,1.5,tri,0.5,1,1.5,0,0.30000000000000004,1.5
