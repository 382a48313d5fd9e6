# eps-normcrm
